from tachyon.main import run

run()
