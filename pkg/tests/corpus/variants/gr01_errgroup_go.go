package jobs

import "golang.org/x/sync/errgroup"

func Fetch(url string) error { return nil }

func FetchAll(urls []string) error {
	var g errgroup.Group
	for i := 0; i < len(urls); i++ {
		g.Go(func() error {
			return Fetch(urls[i]) // want GR01
		})
	}
	return g.Wait()
}
