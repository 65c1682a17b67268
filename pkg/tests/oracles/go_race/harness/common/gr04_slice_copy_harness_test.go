package slices

import (
	"testing"
	"time"
)

func TestHarness(t *testing.T) {
	ProcessAll([]string{"a", "b", "c", "d", "e", "f", "g", "h"})
	time.Sleep(50 * time.Millisecond)
}
