# Subcritical two-type system
init X
X -> X Y : 0.1
X -> Y : 0.2
X -> : 0.7
Y -> X Y : 0.2
Y -> Y : 0.3
Y -> : 0.5
