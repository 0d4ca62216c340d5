from optomech.main import run

run()
