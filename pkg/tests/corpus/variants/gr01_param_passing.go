package jobs

type Job struct{ ID int }

func ProcessJob(j Job) {}

func ProcessAll(jobs []Job) {
	for _, job := range jobs {
		go func(job Job) {
			ProcessJob(job)
		}(job)
	}
}
