package group

import "sync"

func process(id int) int { return id }

func FireAndForget(itemIds []int) {
	var wg sync.WaitGroup
	for i := 0; i < len(itemIds); i++ {
		go func(idx int) {
			wg.Add(1)
			process(itemIds[idx])
			wg.Done()
		}(i)
	}
}
