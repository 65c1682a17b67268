package health

import "sync"

type HealthGate struct {
	mutex sync.RWMutex
	ready bool
}

func (g *HealthGate) mark(fast bool) {
	g.mutex.RLock()
	if fast {
		g.mutex.RUnlock()
		g.mutex.Lock()
	}
	g.ready = true // want GR08:Low
}
