# main.py
from fastapi import FastAPI

from api.v1 import routes
from common.config import settings
from common.log_setup import configure_logging

configure_logging(settings.log_level)

app = FastAPI(title=settings.app_name)
app.include_router(routes.router, prefix="/api/v1")
