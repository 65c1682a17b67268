package orders

import "errors"

type Order struct{}

func GetOrder(uuid string) (*Order, error) { return nil, errors.New(uuid) }

func combineErrors(m map[string]error) error { return nil }

func processOrders(uuids []string) error {
	var errMap = make(map[string]error)
	for _, uuid := range uuids {
		go func(uuid string) {
			orderHandle, err := GetOrder(uuid)
			if err != nil {
				errMap[uuid] = err // want GR05
				return
			}
			_ = orderHandle
		}(uuid)
	}
	return combineErrors(errMap)
}
