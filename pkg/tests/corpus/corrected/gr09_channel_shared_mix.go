package future

import (
	"context"
	"errors"
)

var ErrCancelled = errors.New("cancelled by context")

type result struct {
	response interface{}
	err      error
}

type Future struct {
	f  func() (interface{}, error)
	ch chan result
}

func NewFuture(f func() (interface{}, error)) *Future {
	return &Future{f: f, ch: make(chan result, 1)}
}

func (f *Future) Start() {
	go func() {
		resp, err := f.f()
		f.ch <- result{resp, err}
	}()
}

func (f *Future) Wait(ctx context.Context) (interface{}, error) {
	select {
	case r := <-f.ch:
		return r.response, r.err
	case <-ctx.Done():
		return nil, ErrCancelled
	}
}
