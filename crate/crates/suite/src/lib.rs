//! Holds the `acceptance` test target, which checks reference figures and
//! numerical properties across `boundwealth` and its command line front end.
