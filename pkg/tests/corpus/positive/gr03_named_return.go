package named

func compute() bool { return false }
func consume(v int) {}

func NamedReturnCallee() (result int) {
	result = 10
	if compute() {
		return // this has the effect of "return 10"
	}
	go func() {
		consume(result) // want GR03
	}()
	return 20 // this is equivalent to result=20
}

func Caller() {
	retVal := NamedReturnCallee()
	_ = retVal
}
