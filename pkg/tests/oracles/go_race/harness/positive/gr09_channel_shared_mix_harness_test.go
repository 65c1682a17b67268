package future

import (
	"context"
	"testing"
	"time"
)

func TestHarness(t *testing.T) {
	ctx, cancel := context.WithCancel(context.Background())
	cancel()
	for i := 0; i < 10; i++ {
		f := &Future{f: func() (interface{}, error) { return 1, nil }, ch: make(chan int)}
		f.Start()
		_ = f.Wait(ctx)
	}
	time.Sleep(50 * time.Millisecond)
}
