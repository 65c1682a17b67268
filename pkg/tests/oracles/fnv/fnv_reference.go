package main

import (
	"fmt"
	"hash/fnv"
)

func main() {
	for _, s := range []string{"", "a", "foobar", "A>B>C||P>Q>R"} {
		h := fnv.New64a()
		h.Write([]byte(s))
		fmt.Printf("%q %016x\n", s, h.Sum64())
	}
}
