package group

import "testing"

func TestHarness(t *testing.T) {
	for i := 0; i < 10; i++ {
		WaitGrpExample([]int{1, 2, 3, 4, 5, 6, 7, 8})
	}
}
