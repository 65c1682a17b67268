package slices

import "sync"

func Fetch(id string) string { return id }

func Collect(ids []string) []string {
	results := make([]string, len(ids))
	var wg sync.WaitGroup
	for i, id := range ids {
		wg.Add(1)
		go func(i int, id string) {
			defer wg.Done()
			results[i] = Fetch(id)
		}(i, id)
	}
	wg.Wait()
	return results
}
