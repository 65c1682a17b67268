package counter

var requests int64

func Record() {
	requests++
}

func Snapshot() int64 {
	return requests
}
