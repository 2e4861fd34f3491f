from src import app

app(prog_name="screenbench")
