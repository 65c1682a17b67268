package named

func compute() bool { return false }
func consume(v int) {}

func NamedReturnCallee() (result int) {
	result = 10
	if compute() {
		return
	}
	snapshot := result
	go func() {
		consume(snapshot)
	}()
	return 20
}

func Caller() {
	retVal := NamedReturnCallee()
	_ = retVal
}
