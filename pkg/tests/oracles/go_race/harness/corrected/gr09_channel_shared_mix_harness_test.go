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
		f := NewFuture(func() (interface{}, error) { return 1, nil })
		f.Start()
		_, _ = f.Wait(ctx)
	}
	time.Sleep(50 * time.Millisecond)
}
