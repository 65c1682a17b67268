package named

func compute() bool { return true }

func NamedReturn() (result int) {
	result = 10
	if compute() {
		return
	}
	return 20
}
