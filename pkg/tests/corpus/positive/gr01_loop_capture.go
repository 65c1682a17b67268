package jobs

func ProcessJob(job string) {}

func ProcessAll(jobs []string) {
	for _, job := range jobs {
		go func() {
			ProcessJob(job) // want GR01
		}()
	} // end for
}
