package main

import "sync"

var a int

// CriticalSection receives a pointer to the shared mutex.
func CriticalSection(m *sync.Mutex) {
	m.Lock()
	a++
	m.Unlock()
}

func main() {
	mutex := sync.Mutex{}
	go CriticalSection(&mutex)
	go CriticalSection(&mutex)
}
