// Package tour exercises a broad slice of Go syntax.
package tour

import (
	"context"
	"errors"
	"fmt"
	str "strings"
	"sync"
	_ "embed"
)

const (
	A = iota
	B
	C = "c" + `raw
string`
)

type (
	Number interface {
		~int | ~int64 | float64
	}
	Pair[K comparable, V any] struct {
		Key   K `json:"key"`
		Value V
	}
	Handler func(ctx context.Context, req *Request) (resp *Response, err error)
	Request struct {
		sync.Mutex
		ID    int
		Tags  map[string][]string
		Ch    <-chan struct{}
		Out   chan<- int
		Inner struct{ X, Y float64 }
		Arr   [4]byte
		Fn    func(int, ...string) error
	}
	Response struct{ Body []byte }
	Alias = Request
)

var ErrBad = errors.New("bad")

var (
	x, y int = 1, 2
	z        = map[string]int{"a": 1, "ü": 2}
)

func Sum[T Number](xs ...T) (total T) {
	for _, v := range xs {
		total += v
	}
	return
}

func (r *Request) Method(a, b int, c ...string) (int, error) {
	if r == nil {
		return 0, ErrBad
	} else if a > b {
		return a, nil
	} else {
		return b, nil
	}
}

func (Pair[K, V]) String() string { return "" }

func control(ctx context.Context, items []Request, n int) (out []int, err error) {
	var mu sync.RWMutex
	done := make(chan struct{}, 1)
	results := make(chan int)
outer:
	for i := 0; i < n; i++ {
		switch {
		case i%2 == 0:
			continue outer
		case i > 10:
			break outer
		default:
			fallthrough
		case i == 3:
		}
		for range items {
		}
		for j := range 10 {
			_ = j
		}
		for {
			break
		}
	}
	if p := (Pair[string, int]{Key: "k"}); p.Key != "" {
		out = append(out, p.Value)
	}
	for _, it := range []Request{{ID: 1}, {ID: 2}} {
		_ = it
	}
	switch v := interface{}(n).(type) {
	case int, int64:
		_ = v
	case nil:
	default:
		_ = fmt.Sprint(v)
	}
	go func() {
		defer close(done)
		mu.Lock()
		defer mu.Unlock()
		results <- 1
	}()
	select {
	case v, ok := <-results:
		_, _ = v, ok
	case <-ctx.Done():
		return nil, ctx.Err()
	case done <- struct{}{}:
	default:
	}
	m := map[Pair[string, int]][]*Request{}
	_ = m
	f := func(xs ...int) int { return len(xs) }
	_ = f(out...)
	s := str.ToUpper("x")[1:2:3]
	_ = s
	var arr [3]int
	arr[0]++
	p := &arr
	(*p)[1] = 2
	x <<= 1
	y &^= 3
	ch := make(chan chan<- int)
	_ = ch
	r := 'x' + '\n' + 'é'
	_ = r
	c := 1.5e3 + 0x1p-2 + 2i
	_ = c
	goto end
end:
	return out, err
}
