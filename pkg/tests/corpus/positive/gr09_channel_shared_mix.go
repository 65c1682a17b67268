package future

import (
	"context"
	"errors"
)

var ErrCancelled = errors.New("cancelled by context")

type Future struct {
	f        func() (interface{}, error)
	ch       chan int
	response interface{}
	err      error
}

func (f *Future) Start() {
	go func() {
		resp, err := f.f() // invoke a registered function
		f.response = resp
		f.err = err // want GR09
		f.ch <- 1   // may block forever!
	}()
}

func (f *Future) Wait(ctx context.Context) error {
	select {
	case <-f.ch:
		return nil
	case <-ctx.Done():
		f.err = ErrCancelled
		return ErrCancelled
	}
}
