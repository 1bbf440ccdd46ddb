use thiserror::Error;

pub type Result<T> = std::result::Result<T, ToposError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToposError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("missing composite {g}∘{f}")]
    MissingComposite { g: String, f: String },
    #[error("composite {g}∘{f} defined for a non-composable pair")]
    SpuriousComposite { g: String, f: String },
    #[error("composite {g}∘{f} = {h} has the wrong domain or codomain")]
    CompositeTyping { g: String, f: String, h: String },
    #[error("identity law fails for arrow `{arrow}` with identity `{identity}`")]
    IdentityViolation { arrow: String, identity: String },
    #[error("associativity fails: ({h}∘{g})∘{f} ≠ {h}∘({g}∘{f})")]
    AssociativityViolation { h: String, g: String, f: String },
    #[error("categories with more than {max} arrows are not supported ({got})")]
    TooManyArrows { max: usize, got: usize },
    #[error("monoid law violated: {0}")]
    MonoidLaw(String),
    #[error("functor law violated in presheaf `{presheaf}`: {detail}")]
    FunctorViolation { presheaf: String, detail: String },
    #[error("naturality square fails at arrow `{arrow}` on element `{element}`")]
    NaturalityViolation { arrow: String, element: String },
    #[error("objects live over different base categories")]
    BaseMismatch,
    #[error("size budget exceeded: {what} needs more than {budget} elements")]
    SizeBudgetExceeded { what: String, budget: usize },
    #[error("subfunctor is not closed under the action of `{arrow}`")]
    NotActionClosed { arrow: String },
    #[error("component is not a valid function: {0}")]
    BadComponent(String),
    #[error("syntax error at {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at {pos}")]
    UnknownSymbol { name: String, pos: usize },
    #[error("type mismatch at {pos}: {msg}")]
    TypeMismatch { pos: usize, msg: String },
    #[error("ground type `{0}` is not bound")]
    UnboundGround(String),
    #[error("sentence has free variable `{0}`")]
    FreeVariable(String),
    #[error("equivariance violated at arrow `{arrow}`: {detail}")]
    EquivarianceViolation { arrow: String, detail: String },
    #[error("budget of {budget} exhausted while computing {what}")]
    BudgetExhausted { what: String, budget: usize },
    #[error("malformed input: {0}")]
    Malformed(String),
}
