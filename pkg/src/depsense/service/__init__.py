from .app import Resources, create_app, load_resources

__all__ = ["Resources", "create_app", "load_resources"]
