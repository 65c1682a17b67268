package jobs

func ProcessJob(job string) {}

func ProcessAll(jobs []string) {
	for _, job := range jobs {
		job := job
		go func() {
			ProcessJob(job)
		}()
	} // end for
}
