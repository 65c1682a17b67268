package redeem

type Entity struct{}
type Response struct{}
type Client struct{}

func (c *Client) Foo(req Entity, err error) (Response, error) { return Response{}, err }

func CheckRequest(req Entity) error          { return nil }
func ProcessRequest(req Entity, failed bool) {}

var c = &Client{}

func Redeem(request Entity) (resp Response, err error) {
	defer func() {
		resp, err = c.Foo(request, err)
	}()
	err = CheckRequest(request)
	go func() {
		ProcessRequest(request, err != nil) // want GR03
	}()
	return // the defer function runs after here
}
