package stats

import "sync/atomic"

type Stats struct {
	hits   int64
	misses int64
}

func (s *Stats) Hit() {
	atomic.AddInt64(&s.hits, 1)
}

func (s *Stats) Miss() {
	s.misses++
}

func (s *Stats) Report() (int64, int64) {
	return s.hits, s.misses // want GR10
}
