package counter

import "sync/atomic"

var requests int64

func Record() {
	atomic.AddInt64(&requests, 1)
}

func Reset() {
	atomic.StoreInt64(&requests, 0)
}

func Snapshot() int64 {
	return atomic.LoadInt64(&requests)
}
