from fmdpy.core.space import (VariableSpace, Scope, StateAssignment, state_index, index_state, all_states,
                              check_state, local_index)
from fmdpy.core.tables import LocalTable, TransitionFactor, RewardFactor, extend_lookup, extension_matrix
from fmdpy.core.model import (FmdpSpec, Violation, ViolationKind, transition_prob, successor_distribution,
                              expected_local_value, reward, validate_model, factored_size, specs_equal)
