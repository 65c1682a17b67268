package group

import "sync"

func process(id int) int { return id }

func WaitGrpExample(itemIds []int) int {
	var wg sync.WaitGroup
	results := make([]int, len(itemIds))
	for i := 0; i < len(itemIds); i++ {
		go func(idx int) {
			wg.Add(1) // want GR07
			results[idx] = process(itemIds[idx])
			wg.Done()
		}(i)
	}
	wg.Wait() // waits for the participants added so far.
	total := 0
	for _, r := range results {
		total += r
	}
	return total
}
