package offers

import "sync"

type Order struct{}
type Offer struct{}

func enrichOffers(orders []*Order) ([]*Offer, []error) {
	wg := &sync.WaitGroup{}
	res := make([]*Offer, len(orders))
	errs := make([]error, len(orders))
	for i, order := range orders {
		wg.Add(1)
		go func(i int, order *Order) {
			res[i], errs[i] = enrichOne(order, wg) // want GR07:Low
		}(i, order)
	}
	wg.Wait()
	return res, errs
}

func enrichOne(order *Order, wg *sync.WaitGroup) (*Offer, error) {
	defer wg.Done()
	return &Offer{}, nil
}
