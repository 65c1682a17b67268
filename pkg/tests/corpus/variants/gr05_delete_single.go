package cache

type Entry struct{}

func Evict(entries map[string]*Entry, key string) int {
	go func() {
		delete(entries, key) // want GR05:Medium
	}()
	return len(entries)
}
