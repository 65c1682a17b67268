package slices

import "sync"

func Foo(id string) string { return id }

func ProcessAll(uuids []string) {
	var myResults []string
	var mutex sync.Mutex
	safeAppend := func(res string) {
		mutex.Lock()
		myResults = append(myResults, res)
		mutex.Unlock()
	}

	for _, uuid := range uuids {
		go func(id string, results []string) {
			res := Foo(id)
			safeAppend(res)
		}(uuid, myResults) // want GR04
	}
}
