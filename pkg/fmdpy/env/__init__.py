from fmdpy.env.sim import Environment, sample_next
from fmdpy.env.generators import make_chain, make_sysadmin_ring, make_random_fmdp
