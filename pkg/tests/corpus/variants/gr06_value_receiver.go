package counter

import "sync"

type A struct {
	sync.Mutex
	n int
}

func (a A) byValue() { // want GR06
	a.Lock()
	a.n++
	a.Unlock()
}

func (a *A) byPointer() {
	a.Lock()
	a.n++
	a.Unlock()
}
