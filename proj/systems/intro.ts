# Two-type critical system
init X
X -> X X : 0.2
X -> X Y : 0.3
X -> : 0.5
Y -> X : 0.7
Y -> Y : 0.3
