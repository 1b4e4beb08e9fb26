"""HTTP service layer: pydantic models, handlers, FastAPI app."""
