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
	g.mutex.Lock()
	defer g.mutex.Unlock()
	total := g.healthy + g.unhealthy
	if total > 0 && g.unhealthy == 0 && !g.ready {
		g.ready = true
		g.gate.Accept()
	}
}
