package main

import "sync"

var a int

// CriticalSection receives a copy of mutex.
func CriticalSection(m sync.Mutex) { // want GR06
	m.Lock()
	a++
	m.Unlock()
}

func main() {
	mutex := sync.Mutex{}
	// passes a copy of m to A.
	go CriticalSection(mutex)
	go CriticalSection(mutex)
}
