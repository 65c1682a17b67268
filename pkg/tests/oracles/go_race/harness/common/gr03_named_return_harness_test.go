package named

import (
	"testing"
	"time"
)

func TestHarness(t *testing.T) {
	for i := 0; i < 10; i++ {
		Caller()
	}
	time.Sleep(50 * time.Millisecond)
}
