package errs

import "log"

func Foo() (int, error) { return 0, nil }
func Baz() (int, error) { return 2, nil }

func Handle() int {
	x, err := Foo()
	go func() {
		if err != nil { // want GR02:Medium
			log.Println("first call failed")
		}
	}()
	x, err = Baz()
	if err != nil {
		return 0
	}
	return x
}
