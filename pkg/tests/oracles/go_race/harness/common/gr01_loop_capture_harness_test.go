package jobs

import (
	"testing"
	"time"
)

func TestHarness(t *testing.T) {
	for i := 0; i < 10; i++ {
		ProcessAll([]string{"a", "b", "c", "d"})
	}
	time.Sleep(50 * time.Millisecond)
}
