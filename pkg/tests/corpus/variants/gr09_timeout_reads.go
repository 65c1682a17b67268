package future

import (
	"context"
	"log"
)

type Future struct {
	f        func() (interface{}, error)
	ch       chan int
	response interface{}
	err      error
}

func (f *Future) Start() {
	go func() {
		resp, err := f.f()
		f.response = resp
		f.err = err
		f.ch <- 1
	}()
}

func (f *Future) Wait(ctx context.Context) error {
	select {
	case <-f.ch:
		return nil
	case <-ctx.Done():
		log.Println(f.err)
		return ctx.Err()
	}
}
