package errs

func Foo() (int, error) { return 0, nil }
func Bar() (int, error) { return 1, nil }
func Baz() (int, error) { return 2, nil }

func Handle() int {
	x, err := Foo()
	if err != nil {
		return 0
	}

	go func() {
		var y int
		y, err = Bar() // want GR02
		if err != nil {
			_ = y
		}
	}()

	var z int
	z, err = Baz()
	if err != nil {
		return z
	}
	return x + z
}
