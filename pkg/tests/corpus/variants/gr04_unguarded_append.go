package slices

func Fetch(id string) string { return id }

func Collect(ids []string) []string {
	var results []string
	for _, id := range ids {
		go func(id string) {
			results = append(results, Fetch(id)) // want GR04:Medium
		}(id)
	}
	return results
}
