package health

import "sync"

type HealthGate struct {
	mutex   sync.RWMutex
	healthy int
	ready   bool
}

func (g *HealthGate) isReady() bool {
	g.mutex.RLock()
	defer g.mutex.RUnlock()
	if g.healthy > 0 && g.ready {
		return true
	}
	return false
}
