package slices

import "sync"

func Foo(id string) string { return id }

func ProcessAll(uuids []string) {
	var myResults []string
	var mutex sync.Mutex
	safeAppend := func(results *[]string, res string) {
		mutex.Lock()
		*results = append(*results, res)
		mutex.Unlock()
	}

	for _, uuid := range uuids {
		go func(id string, results *[]string) {
			res := Foo(id)
			safeAppend(results, res)
		}(uuid, &myResults)
	}
}
