# kleinpack tests
