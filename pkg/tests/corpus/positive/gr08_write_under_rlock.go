package health

import "sync"

type Gate struct{}

func (g *Gate) Accept() error { return nil }

type HealthGate struct {
	mutex     sync.RWMutex
	healthy   int
	unhealthy int
	ready     bool
	gate      *Gate
}

func (g *HealthGate) updateGate() {
	g.mutex.RLock()
	defer g.mutex.RUnlock()
	total := g.healthy + g.unhealthy
	if total > 0 && g.unhealthy == 0 && !g.ready {
		g.ready = true // want GR08
		g.gate.Accept()
	}
}
