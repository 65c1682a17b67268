package main

import "sync"

var a int

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
