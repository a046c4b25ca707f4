RBNF = r"""
NAME := ''
NUMBER := ''

document      ::= 'fmdp' name=NAME '{' (items<<item)* '}'                             -> Document(named(name), items or [])
item          ::= it=(setting | variables | actions | start | transition | reward | basis) -> it

number        ::= [neg='-'] value=NUMBER                                              -> number_rewrite(neg, value)
setting       ::= key=('gamma' | 'rmax' | 'scope_bound') '=' value=number ';'         -> Setting(key.value, value, **loc @ key)

variables     ::= mark='variables' '{' (decls<<variable_decl)* '}'                    -> Variables(decls or [], **loc @ mark)
variable_decl ::= name=NAME ':' size=number ';'                                       -> VariableDecl(named(name), size)
actions       ::= mark='actions' '{' (names<<action_decl)* '}'                        -> Actions(names or [], **loc @ mark)
action_decl   ::= name=NAME ';'                                                       -> named(name)
start         ::= mark='start' '{' (decls<<start_decl)* '}'                           -> Start(decls or [], **loc @ mark)
start_decl    ::= name=NAME ':' value=number ';'                                      -> StartDecl(named(name), value)

# keys list one value per `given` variable, in the order `given` names them
given         ::= 'given' '(' [names<<NAME (',' names<<NAME)*] ')'                    -> [named(each) for each in names or []]
key           ::= '(' [values<<NUMBER (',' values<<NUMBER)*] ')'                      -> key_rewrite(values)
numbers       ::= '[' seq<<number (',' seq<<number)* ']'                              -> seq

transition    ::= mark='transition' target=NAME given=given '{' (rows<<transition_row)* '}'
                  -> Transition(named(target), given, rows or [], **loc @ mark)
transition_row ::= action=NAME key=key ':' probs=numbers ';'                          -> TransitionRow(named(action), key, probs)

reward        ::= mark='reward' name=NAME given=given '{' (rows<<reward_row)* '}'
                  -> Reward(named(name), given, rows or [], **loc @ mark)
reward_row    ::= action=NAME key=key ':' value=number ';'                            -> RewardRow(named(action), key, value)

basis         ::= mark='basis' name=NAME given=given '{' (rows<<basis_row)* '}'
                  -> Basis(named(name), given, rows or [], **loc @ mark)
basis_row     ::= key=key ':' value=number ';'                                        -> BasisRow(key, value)
"""
