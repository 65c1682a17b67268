package errs

import "log"

func Foo() (int, error) { return 0, nil }

func Handle() int {
	x, err := Foo()
	go func() {
		if err != nil {
			log.Println(err)
		}
	}()
	if err != nil {
		return 0
	}
	return x
}
