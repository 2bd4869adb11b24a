from hypothesis import settings

settings.register_profile("lore", deadline=None, max_examples=50)
settings.load_profile("lore")
