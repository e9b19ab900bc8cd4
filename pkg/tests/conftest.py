from hypothesis import HealthCheck, settings

# profile and map evaluations are cached lazily; the first example pays for it
settings.register_profile("hslab", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("hslab")
