package orders

import "fmt"

func processOrders(uuids []string, names map[string]string) {
	for _, uuid := range uuids {
		go func(uuid string) {
			if name, ok := names[uuid]; ok {
				fmt.Println(name)
			}
		}(uuid)
	}
}
