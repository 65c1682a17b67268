package orders

import (
	"errors"
	"sync"
)

type Order struct{}

func GetOrder(uuid string) (*Order, error) { return nil, errors.New(uuid) }

func combineErrors(m map[string]error) error { return nil }

func processOrders(uuids []string) error {
	var errMap = make(map[string]error)
	var mu sync.Mutex
	var wg sync.WaitGroup
	for _, uuid := range uuids {
		wg.Add(1)
		go func(uuid string) {
			defer wg.Done()
			orderHandle, err := GetOrder(uuid)
			if err != nil {
				mu.Lock()
				errMap[uuid] = err
				mu.Unlock()
				return
			}
			_ = orderHandle
		}(uuid)
	}
	wg.Wait()
	return combineErrors(errMap)
}
