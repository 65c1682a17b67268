package product

import "testing"

type Product struct{ field1 int }

func (s *Product) Process(f1 int) (string, error) {
	s.field1 = f1
	return "Success", nil
}

func TestProduct(t *testing.T) {
	s := &Product{}
	testSuite := []struct {
		name           string
		field1         int
		expectedResult string
	}{
		{name: "Test1", field1: 42, expectedResult: "Success"},
		{name: "Test2", field1: -42, expectedResult: "Success"},
	}
	for _, tt := range testSuite {
		t.Run(tt.name, func(t *testing.T) {
			t.Parallel()
			res, err := s.Process(tt.field1) // want GR11
			if err != nil || res != tt.expectedResult {
				t.Fail()
			}
		})
	}
}
